#pragma once

#include "modcurve/commands.hpp"
#include "modcurve/curves.hpp"
#include "modcurve/error.hpp"
#include "modcurve/galois.hpp"
#include "modcurve/gl_index.hpp"
#include "modcurve/group.hpp"
#include "modcurve/io.hpp"
#include "modcurve/isograph.hpp"
#include "modcurve/lattice.hpp"
#include "modcurve/rational.hpp"
#include "modcurve/text.hpp"
#include "modcurve/zmatrix.hpp"
