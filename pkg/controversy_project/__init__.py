"""Django project wrapping the controversy estimation toolkit."""
