"""Coordination between the models and the command line"""
