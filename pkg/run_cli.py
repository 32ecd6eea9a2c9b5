#!/usr/bin/env python3
"""
Development runner for the command line.
Usage: python run_cli.py [--seed S] COMMAND ...
"""
from app.main import main

if __name__ == "__main__":
    main()
