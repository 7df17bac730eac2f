"""pyjai tests."""
