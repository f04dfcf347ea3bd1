#pragma once

#include "equivocation/bounds.hpp"
#include "equivocation/entropy.hpp"
#include "equivocation/errors.hpp"
#include "equivocation/joint_distribution.hpp"
#include "equivocation/symmetry.hpp"
#include "equivocation/verify.hpp"
#include "equivocation/walk.hpp"
