"""Fredholm determinants of fourth-order operators with compactly supported coefficients."""
