"""End-to-end and acceptance tests for python-setreg."""
