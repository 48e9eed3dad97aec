#pragma once

#include "fracsub/harness/compare.hpp"
#include "fracsub/harness/ensemble.hpp"
#include "fracsub/harness/figures.hpp"
#include "fracsub/harness/limit_study.hpp"
#include "fracsub/harness/output.hpp"
