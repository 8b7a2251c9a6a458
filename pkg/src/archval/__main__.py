from archval.cli import main

main()
