"""Logging and shared helpers"""
