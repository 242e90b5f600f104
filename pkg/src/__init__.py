"""floorlattice: exact elimination for the reals with floor, and lattice components"""
