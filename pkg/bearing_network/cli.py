"""``bearing`` console script: a shortcut for ``manage.py bearing``."""
import os
import sys


def main(argv=None):
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "bearing_network.settings")
    from django.core.management import execute_from_command_line

    args = sys.argv[1:] if argv is None else list(argv)
    execute_from_command_line(["bearing", "bearing", *args])


if __name__ == "__main__":
    main()
