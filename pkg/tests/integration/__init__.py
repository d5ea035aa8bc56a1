"""
Integration tests for the decentralized encoding simulator

Long parameter sweeps across the encoders, the framework and the oracle.
"""
