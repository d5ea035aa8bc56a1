"""
Decentralized encoding simulator.

Library and round-synchronous network simulator for computing parity
symbols of linear codes across source and sink processors, with exact
communication cost accounting.
"""

# Main package initialization
__version__ = "0.1.0"
__license__ = "AGPL-3.0"
