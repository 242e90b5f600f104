"""Renderers for command-line output"""
