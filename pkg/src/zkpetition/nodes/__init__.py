"""Networked entities: authority nodes (blind signing, key publication,
partial decryption) and the petition-owner node (registry, double-vote
ledger, tally orchestration), plus their persistence and HTTP surface."""

from .authority import AuthorityNode
from .common import NodeError
from .owner import OwnerNode

__all__ = ["AuthorityNode", "OwnerNode", "NodeError"]
