#pragma once

#include "wcdd/behavior.hpp"
#include "wcdd/dde.hpp"
#include "wcdd/errors.hpp"
#include "wcdd/io.hpp"
#include "wcdd/kernel.hpp"
#include "wcdd/model.hpp"
#include "wcdd/stability.hpp"
