"""Dynamic shortest-path-counting hub labels."""
