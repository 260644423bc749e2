"""Allow ``python -m sentopics`` as an alternative to the console script."""

from sentopics.cli import console_main

if __name__ == "__main__":
    console_main()
