"""Formulas, elimination passes, cells, complexes and constructions"""
