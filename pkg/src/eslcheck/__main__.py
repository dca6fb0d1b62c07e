from eslcheck.cli import main

main()
