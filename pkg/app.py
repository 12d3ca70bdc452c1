#!/usr/bin/env python3
import sys

from pacstate.cli.cli_handler import main

sys.exit(main())
