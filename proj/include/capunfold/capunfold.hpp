#pragma once

#include "capunfold/error.hpp"
#include "capunfold/predicates.hpp"
#include "capunfold/geom.hpp"
#include "capunfold/topology.hpp"
#include "capunfold/cap.hpp"
#include "capunfold/capgen.hpp"
#include "capunfold/forest.hpp"
#include "capunfold/unfold.hpp"
#include "capunfold/base.hpp"
#include "capunfold/io.hpp"
