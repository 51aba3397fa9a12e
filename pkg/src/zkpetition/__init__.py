"""Anonymous e-petition toolkit: threshold blind credentials, unlinkable
shows with per-petition double-vote tags, and homomorphic encrypted
tallies with chained joint decryption."""

__version__ = "0.1.0"
