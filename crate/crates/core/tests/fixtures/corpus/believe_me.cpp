struct I_KNOW_VECTOR_BOOL { };

template <class T, class Alloc = std::alloc, class Info = int>
class vector { };

template <class Alloc>
class __VectorBool
{
  // original implementation of vector<bool>
};

template <class Alloc>
class vector<bool, I_KNOW_VECTOR_BOOL, Alloc>: 
  public __VectorBool<Alloc>
{ };

template <class Alloc>
class vector<bool, Alloc, I_KNOW_VECTOR_BOOL>: 
  public __VectorBool<Alloc> { };

template <class Alloc, class Info>
class vector<bool, Alloc, Info>: 
  public __VectorBool<Alloc>
{
public:
  vector(): __VectorBool<Alloc>()
  {
    warning( VECTOR_BOOL_IS_IN_USE() );
  }

  template<class InputIterator>
  vector( InputIterator first, InputIterator last ): 
    __VectorBool<Alloc>( first, last )
  {
    warning( VECTOR_BOOL_IS_IN_USE() );
  }

  vector( size_t n, const bool& value = bool() ):
    __VectorBool<Alloc>( n, value )
  {
    warning( VECTOR_BOOL_IS_IN_USE() );
  }

  vector( const vector& rhs): __VectorBool<Alloc>( rhs )
  {
    warning( VECTOR_BOOL_IS_IN_USE() );
  }
};

vector<bool, I_KNOW_VECTOR_BOOL> flags;
vector<bool, std::allocator<bool>, I_KNOW_VECTOR_BOOL> bits;
std::vector<bool> legacy; // stl-sentry: believe-me(VEC_BOOL)
std::vector<std::auto_ptr<int> > audited; // stl-sentry: believe-me(COAP)
