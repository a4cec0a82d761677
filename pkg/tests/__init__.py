# Curve Proximity Queries - Test Suite
