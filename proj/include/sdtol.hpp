#pragma once

// Umbrella header: worst-case tolerance analysis and specification synthesis
// for 3D machining process plans.

#include "sdtol/error.hpp"
#include "sdtol/gauge.hpp"
#include "sdtol/io.hpp"
#include "sdtol/linexpr.hpp"
#include "sdtol/lp.hpp"
#include "sdtol/mmp.hpp"
#include "sdtol/optimizer.hpp"
#include "sdtol/params.hpp"
#include "sdtol/part.hpp"
#include "sdtol/problems.hpp"
#include "sdtol/process.hpp"
#include "sdtol/report.hpp"
#include "sdtol/synthesis.hpp"
#include "sdtol/torsor.hpp"
#include "sdtol/vec.hpp"
