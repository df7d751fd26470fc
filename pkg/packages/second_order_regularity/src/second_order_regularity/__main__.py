# packages/second_order_regularity/src/second_order_regularity/__main__.py

from second_order_regularity.main import main

if __name__ == "__main__":
    main()
