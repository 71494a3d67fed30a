#pragma once

#include "hitkernel/error.hpp"
#include "hitkernel/monomials.hpp"
#include "hitkernel/gf2.hpp"
#include "hitkernel/steenrod.hpp"
#include "hitkernel/parallel.hpp"
#include "hitkernel/qpspace.hpp"
#include "hitkernel/kameko.hpp"
#include "hitkernel/invariants.hpp"
#include "hitkernel/bounds.hpp"
#include "hitkernel/oracle.hpp"
#include "hitkernel/report.hpp"
