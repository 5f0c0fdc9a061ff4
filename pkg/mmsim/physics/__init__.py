"""Physics core: parameters, mean field, linear dynamics, covariance, negativity."""
