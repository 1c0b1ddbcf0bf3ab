#include <pybind11/pybind11.h>
PYBIND11_MODULE(_mode360, m) { m.doc() = "placeholder"; }
