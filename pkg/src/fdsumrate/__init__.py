"""Full-duplex access point sum-rate toolkit.

Monte Carlo simulation and analytical evaluation of uplink/downlink average
rates for a multi-antenna full-duplex access point serving half-duplex users
drawn from a planar Poisson process, under matched-filter, zero-forcing, and
jointly optimized transmit/receive beamforming, with half-duplex baselines.
"""

__version__ = "0.1.0"
