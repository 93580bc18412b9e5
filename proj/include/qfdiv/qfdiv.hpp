#ifndef QFDIV_QFDIV_HPP
#define QFDIV_QFDIV_HPP

#include "qfdiv/bipartite.hpp"
#include "qfdiv/channels.hpp"
#include "qfdiv/condent.hpp"
#include "qfdiv/errors.hpp"
#include "qfdiv/extended_real.hpp"
#include "qfdiv/fdiv.hpp"
#include "qfdiv/linalg.hpp"
#include "qfdiv/matrix_io.hpp"
#include "qfdiv/optimize.hpp"
#include "qfdiv/propsuite.hpp"
#include "qfdiv/random.hpp"

#endif  // QFDIV_QFDIV_HPP
