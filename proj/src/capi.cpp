#include "sieglab/sieglab.h"
