"""Test suite for floorlattice"""
