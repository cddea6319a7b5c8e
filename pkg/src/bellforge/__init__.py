"""Bell-functional toolkit."""
