#ifndef SIEGLAB_EXPERIMENTS_HPP
#define SIEGLAB_EXPERIMENTS_HPP
// placeholder
#endif
