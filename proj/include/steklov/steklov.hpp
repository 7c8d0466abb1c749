#pragma once

#include "steklov/analysis.hpp"
#include "steklov/eigensolver.hpp"
#include "steklov/errors.hpp"
#include "steklov/fem.hpp"
#include "steklov/interp.hpp"
#include "steklov/io.hpp"
#include "steklov/mesh.hpp"
#include "steklov/study.hpp"
