"""Reading and writing SyGuS-IF and SMT-LIB text."""
