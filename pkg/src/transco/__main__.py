from transco.cli import main

raise SystemExit(main())
