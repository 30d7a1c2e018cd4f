#include "nlam/nominal.hpp"

namespace nlam {

Atom fresh_atom() { return Atom(fresh_atom_variable()); }

}  // namespace nlam
