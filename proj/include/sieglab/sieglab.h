#ifndef SIEGLAB_H
#define SIEGLAB_H
/* placeholder */
#endif
