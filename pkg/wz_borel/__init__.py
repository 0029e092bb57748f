"""Exact series, Borel-plane analysis and ray solver for the Wess-Zumino anomalous dimension."""
