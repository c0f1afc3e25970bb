"""Core registration engine: rasters, representations, tables, graph, ascent."""
