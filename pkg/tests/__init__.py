# Tests for zpd
