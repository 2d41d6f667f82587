namespace ffec {}
