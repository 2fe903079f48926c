from persistlab.cli import main

main()
