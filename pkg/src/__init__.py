"""
Library package for psro-rrd: games, empirical games, solvers, PSRO and backward profile search
"""
