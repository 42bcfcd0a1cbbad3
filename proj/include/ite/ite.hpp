#pragma once

#include "ite/core/error.hpp"
#include "ite/core/parallel.hpp"
#include "ite/core/random.hpp"
#include "ite/core/sample.hpp"
#include "ite/crossk.hpp"
#include "ite/dependence.hpp"
#include "ite/divergence.hpp"
#include "ite/docs.hpp"
#include "ite/entropy.hpp"
#include "ite/estimators.hpp"
#include "ite/framework.hpp"
#include "ite/geometry/kdtree.hpp"
#include "ite/geometry/knn.hpp"
#include "ite/geometry/mst.hpp"
#include "ite/geometry/rank.hpp"
#include "ite/geometry/special.hpp"
#include "ite/io.hpp"
#include "ite/isa.hpp"
#include "ite/quicktest.hpp"
