from mmsim.cli import main

raise SystemExit(main())
