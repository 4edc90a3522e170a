#include <cstdio>
int main() { std::puts("simrsma cli stub"); return 0; }
