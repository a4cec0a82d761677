"""
Command-line harness: scene files, batch queries, benchmarks, replanning
and SVG rendering on top of the proximity query library.
"""
