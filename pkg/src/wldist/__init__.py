"""Weisfeiler-Leman distances between graphs via iterated degree measures."""
