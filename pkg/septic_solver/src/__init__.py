# Septic spline collocation solver
