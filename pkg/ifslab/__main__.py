"""Entry point for python -m ifslab."""

from .cli import main

if __name__ == "__main__":
    main()
