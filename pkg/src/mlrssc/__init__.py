"""Multi-view low-rank sparse subspace clustering."""
