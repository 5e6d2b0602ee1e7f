"""GKZ / Gelfand-Graev hypergeometric functions: lattices, integrals, equations."""
