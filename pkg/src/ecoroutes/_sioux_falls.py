"""Bundled Sioux Falls benchmark network.

The classical 24-node / 76-directed-arc test network, with the canonical
integer free-flow arc lengths used throughout the transportation-research
literature.  Shipped as an edge-list document so `cli export-network` can
emit exactly what the loader parses.
"""

SIOUX_FALLS_EDGE_LIST = """\
# Sioux Falls benchmark network: 24 nodes, 76 directed arcs.
# FROM TO LENGTH directed
1 2 6 directed
1 3 4 directed
2 1 6 directed
2 6 5 directed
3 1 4 directed
3 4 4 directed
3 12 4 directed
4 3 4 directed
4 5 2 directed
4 11 6 directed
5 4 2 directed
5 6 4 directed
5 9 5 directed
6 2 5 directed
6 5 4 directed
6 8 2 directed
7 8 3 directed
7 18 2 directed
8 6 2 directed
8 7 3 directed
8 9 10 directed
8 16 5 directed
9 5 5 directed
9 8 10 directed
9 10 3 directed
10 9 3 directed
10 11 5 directed
10 15 6 directed
10 16 4 directed
10 17 8 directed
11 4 6 directed
11 10 5 directed
11 12 6 directed
11 14 4 directed
12 3 4 directed
12 11 6 directed
12 13 3 directed
13 12 3 directed
13 24 4 directed
14 11 4 directed
14 15 5 directed
14 23 4 directed
15 10 6 directed
15 14 5 directed
15 19 3 directed
15 22 3 directed
16 8 5 directed
16 10 4 directed
16 17 2 directed
16 18 3 directed
17 10 8 directed
17 16 2 directed
17 19 2 directed
18 7 2 directed
18 16 3 directed
18 20 4 directed
19 15 3 directed
19 17 2 directed
19 20 4 directed
20 18 4 directed
20 19 4 directed
20 21 6 directed
20 22 5 directed
21 20 6 directed
21 22 2 directed
21 24 3 directed
22 15 3 directed
22 20 5 directed
22 21 2 directed
22 23 4 directed
23 14 4 directed
23 22 4 directed
23 24 2 directed
24 13 4 directed
24 21 3 directed
24 23 2 directed
"""
