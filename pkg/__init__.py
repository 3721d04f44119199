"""
Init file for the psro-rrd package
"""
