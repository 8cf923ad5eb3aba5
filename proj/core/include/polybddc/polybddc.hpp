#pragma once

#include "polybddc/basis.hpp"
#include "polybddc/bddc.hpp"
#include "polybddc/csv.hpp"
#include "polybddc/experiments.hpp"
#include "polybddc/hybrid_space.hpp"
#include "polybddc/krylov.hpp"
#include "polybddc/mesh.hpp"
#include "polybddc/parallel.hpp"
#include "polybddc/quadrature.hpp"
#include "polybddc/seminorms.hpp"
#include "polybddc/skeletal.hpp"
#include "polybddc/vtk.hpp"
